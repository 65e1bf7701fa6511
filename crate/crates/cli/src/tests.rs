//! End-to-end runs of the command line, in process.

use std::path::Path;

struct Status(i32);

impl Status {
    fn success(&self) -> bool {
        self.0 == 0
    }

    fn code(&self) -> Option<i32> {
        Some(self.0)
    }
}

struct Output {
    status: Status,
    stdout: Vec<u8>,
    stderr: Vec<u8>,
}

fn fso(args: &[&str]) -> Output {
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let argv = std::iter::once("fso").chain(args.iter().copied());
    let code = super::run_with(argv, &mut stdout, &mut stderr);
    Output {
        status: Status(code),
        stdout,
        stderr,
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Data rows as (x, y) pairs, skipping comments and the header.
fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn pdf_mass_plus_atoms_is_one() {
    let o = fso(&["pdf", "--preset", "beam20", "--points", "8000", "--h-max", "0.05"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.ends_with('\n'));
    let zero: f64 = csv
        .lines()
        .find(|l| l.starts_with("# atom_zero"))
        .and_then(|l| l.rsplit("weight=").next())
        .unwrap()
        .parse()
        .unwrap();
    let r = rows(&csv);
    let dh = 0.05 / 8000.0;
    let mass: f64 = r.iter().map(|row| row[1] * dh).sum();
    assert!((mass + zero - 1.0).abs() < 1e-3, "{}", mass + zero);
}

#[test]
fn pdf_with_simulation_reports_summary() {
    let o = fso(&["pdf", "--points", "50", "--simulate", "1e5", "--seed", "3"]);
    assert!(o.status.success());
    let header = stdout(&o).lines().find(|l| !l.starts_with('#')).unwrap().to_string();
    assert_eq!(header, "h,f_h_analytic,f_h_empirical");
    let err = String::from_utf8(o.stderr).unwrap();
    for key in ["n=100000", "seed=3", "ks=", "outage_estimate=", "outage_std=", "atom_full_hat=", "atom_zero_hat="] {
        assert!(err.contains(key), "{err}");
    }
}

#[test]
fn empty_grid_is_a_usage_error() {
    assert_eq!(fso(&["pdf", "--points", "0"]).status.code(), Some(2));
}

#[test]
fn outage_curves_ordered_in_link_length() {
    let dir = tempfile::tempdir().unwrap();
    let mut curves = Vec::new();
    for z in ["18000.0", "20000.0", "22000.0"] {
        let cfg = write(
            dir.path(),
            &format!("z{z}.toml"),
            &format!("[geometry]\nlink_length_m = {z}\naperture_radius_m = 0.1\ndivergence_rad = 2e-4\n"),
        );
        let o = fso(&["outage", "--config", &cfg, "--points", "12"]);
        assert!(o.status.success());
        let csv = stdout(&o);
        assert!(csv.starts_with("# method=numerical\nPt_W,Pout\n"));
        curves.push(rows(&csv));
    }
    for i in 0..12 {
        assert!(curves[0][i][1] <= curves[1][i][1] && curves[1][i][1] <= curves[2][i][1]);
        if i > 0 {
            assert!(curves[1][i][1] <= curves[1][i - 1][1]);
        }
    }
}

#[test]
fn series_tracks_numerical() {
    let args = ["outage", "--preset", "outage", "--pt-min", "1e-4", "--pt-max", "1e-1", "--points", "10"];
    let num = rows(&stdout(&fso(&args)));
    let mut with_series = args.to_vec();
    with_series.extend(["--method", "series"]);
    let ser = rows(&stdout(&fso(&with_series)));
    for (a, b) in num.iter().zip(&ser) {
        if a[1] >= 1e-6 {
            assert!(((b[1] - a[1]) / a[1]).abs() <= 0.05);
        }
    }
}

#[test]
fn single_point_sweep_is_one_row() {
    let o = fso(&["outage", "--pt-min", "1e-3", "--pt-max", "1e-3", "--points", "1"]);
    assert_eq!(rows(&stdout(&o)).len(), 1);
}

#[test]
fn series_rejects_integer_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "int.toml", "[turbulence]\nalpha = 4.0\nbeta = 2.0\n");
    let o = fso(&["outage", "--config", &cfg, "--method", "series"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("integer"));
}

#[test]
fn corrupted_config_fails_before_computing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[pointing]\nsigma_l_m = 0.0\nsigma_b_m = 0.0\n");
    let o = fso(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_key_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "typo.toml", "[snr]\ngamma_threshold = 10.0\n\nnoise = 1.0\n");
    let o = fso(&["pdf", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 4"));
}

#[test]
fn small_footprint_warns_on_approximation() {
    let dir = tempfile::tempdir().unwrap();
    // w_z / r_a = 2
    let cfg = write(dir.path(), "small.toml", "[geometry]\ndivergence_rad = 1e-5\n");
    let o = fso(&["validate", "--config", &cfg, "--samples", "1e5"]);
    let csv = stdout(&o);
    let line = csv.lines().find(|l| l.starts_with("overlap_approximation")).unwrap();
    assert!(line.ends_with(",WARN"), "{line}");
}

#[test]
fn non_convergence_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "tight.toml", "[quadrature]\nmax_subdivisions = 1\nrel_tol = 1e-14\nabs_tol = 1e-300\n");
    assert_eq!(fso(&["beamwander", "--config", &cfg]).status.code(), Some(3));
}

#[test]
fn beamwander_reads_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = write(dir.path(), "cn2.txt", "0 1e-15\n50000 1e-15\n");
    let o = fso(&["beamwander", "--cn2-table", &table]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("sigma_b_m="));
    let flat = fso(&["beamwander"]);
    assert_ne!(text, stdout(&flat));
}

#[test]
fn table_path_resolves_next_to_config() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "cn2.txt", "0 1e-15\n50000 1e-15\n");
    let cfg = write(dir.path(), "s.toml", "[atmosphere.cn2]\nkind = \"table\"\npath = \"cn2.txt\"\n");
    let via_config = fso(&["beamwander", "--config", &cfg]);
    assert!(via_config.status.success(), "{}", String::from_utf8_lossy(&via_config.stderr));
    let via_flag = fso(&["beamwander", "--cn2-table", dir.path().join("cn2.txt").to_str().unwrap()]);
    assert_eq!(stdout(&via_config), stdout(&via_flag));
}

#[test]
fn sweep_rows_and_columns() {
    let o = fso(&["sweep", "--param", "link-length-m", "--from", "15000", "--to", "25000", "--points", "5"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.contains("link_length_m,beam_ratio,sigma_b_m,h_a,outage_floor,Pout\n"));
    let r = rows(&csv);
    assert_eq!(r.len(), 5);
    assert!(r.windows(2).all(|w| w[1][5] >= w[0][5]));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let a = fso(&["outage", "--points", "4", "--output", out.to_str().unwrap()]);
    assert!(a.status.success() && a.stdout.is_empty());
    let b = fso(&["outage", "--points", "4"]);
    assert_eq!(std::fs::read(&out).unwrap(), b.stdout);
}

#[test]
fn validate_default_passes() {
    let o = fso(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
