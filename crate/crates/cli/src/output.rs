use crate::config::ExperimentConfig;

pub const TOOL: &str = "fogcell";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `#` header: tool, command, then every effective config key.
pub fn header(command: &str, cfg: &ExperimentConfig) -> String {
    let mut out = format!("# tool={TOOL} {VERSION}\n# command={command}\n");
    for (k, v) in cfg.entries() {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out
}

/// Rounds to 6 significant digits and prints the shortest exact form.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}")
        .parse()
        .expect("scientific literal parses");
    rounded.to_string()
}

/// Drops `#` lines.
pub fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}
