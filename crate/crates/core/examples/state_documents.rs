//! The JSON-lines documents the `xree` binary reads, driven in-process.

use xstate_ree::cli;

pub fn run_example() -> xstate_ree::Result<()> {
    let dir = std::env::temp_dir().join(format!("xree-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| xstate_ree::Error::Internal(e.to_string()))?;
    let input = dir.join("states.jsonl");
    let docs = [
        r#"{"family": {"name": "rains"}}"#,
        r#"{"params": {"A1": 0.1, "A2": 0.4, "A3": 0.3, "A4": 0.2, "D": 0.3}}"#,
        r#"{"bloch": {"r": 0.0, "s": 0.0, "gx": -1.0, "gz": -1.0}}"#,
        r#"{"params": {"A1": 0.1, "A2": 0.4, "A3": 0.3}}"#,
    ];
    std::fs::write(&input, docs.join("\n")).map_err(|e| xstate_ree::Error::Internal(e.to_string()))?;

    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["xree", "compute", "--bits", "--input", input.to_str().unwrap_or_default()];
    let code = cli::run(args, &mut out, &mut err);
    for line in String::from_utf8_lossy(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| xstate_ree::Error::Parse(e.to_string()))?;
        match v.get("branch") {
            Some(b) => println!("{b}: {} bits", v["ree_bits"]),
            None => println!("error: {}", v["error"]["message"]),
        }
    }
    println!("exit code {code}");
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
