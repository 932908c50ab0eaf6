//! Drive the batch front end from code: write a spectrum table and its run
//! manifest into a scratch directory and print what was produced.
//!
//! ```bash
//! cargo run --example batch_run
//! ```

use std::fs;

fn main() -> std::io::Result<()> {
    let out = std::env::temp_dir().join("landau-batch-run");
    fs::create_dir_all(&out)?;
    let args = ["landau", "spectrum", "--B0", "1e15", "--n", "-0.4", "--nu-max", "3", "--out"];
    let code = landau::run::main_with_args(args.iter().map(Into::into).chain([out.clone().into_os_string()]));
    println!("exit code {code}, outputs in {}", out.display());
    for name in ["spectrum_n-0.4.csv", "spectrum_manifest.json"] {
        let path = out.join(name);
        if let Ok(text) = fs::read_to_string(&path) {
            println!("--- {name}\n{text}");
        }
    }
    Ok(())
}
