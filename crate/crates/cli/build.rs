use std::process::Command;

fn main() {
    let pkg = env!("CARGO_PKG_VERSION");
    let rev = Command::new("git")
        .args(["rev-parse", "--short=10", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty());
    let version = match rev {
        Some(rev) => format!("v{pkg}-g{rev}"),
        None => format!("v{pkg}"),
    };
    println!("cargo:rustc-env=TLINCOMB_VERSION={version}");
    println!("cargo:rerun-if-changed=build.rs");
}
