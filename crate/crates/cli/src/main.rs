use std::process::ExitCode;

fn main() -> ExitCode {
    let env = std::env::var(contextuality_cli::BUDGET_ENV).ok();
    let code = contextuality_cli::run(
        std::env::args_os(),
        env.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
