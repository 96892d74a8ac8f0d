//! Drives the command-line interface in-process: simulate, then validate.

use proven_in_use::cli::run;

fn main() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/specs");
    let out = std::env::temp_dir().join("piu-cli-pipeline");
    let out = out.to_str().expect("utf-8 temp dir");
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    for spec in ["superposition_500.json", "nhpp_growth.json"] {
        let code = run(
            [
                "piu",
                "simulate",
                &format!("{dir}/{spec}"),
                "--seed",
                "9",
                "--out",
                out,
            ],
            &mut stdout,
            &mut stderr,
        );
        assert_eq!(code, 0);
        let csv = format!("{out}/timeline.csv");
        let code = run(
            ["piu", "validate", csv.as_str(), "--seed", "9"],
            &mut stdout,
            &mut stderr,
        );
        println!("{spec}: validate exit status {code}\n");
    }
}
