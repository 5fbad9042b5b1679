use std::process::ExitCode;

fn main() -> ExitCode {
    let code = std::panic::catch_unwind(|| algebroidlab::main_with(std::env::args_os())).unwrap_or(1);
    ExitCode::from(code.clamp(0, 255) as u8)
}
