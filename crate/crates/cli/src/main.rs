use std::io::Write;

fn main() -> anyhow::Result<()> {
    let outcome = asdim_cli::run(std::env::args_os());
    std::io::stdout().write_all(outcome.stdout.as_bytes())?;
    std::io::stderr().write_all(outcome.stderr.as_bytes())?;
    std::process::exit(outcome.code);
}
