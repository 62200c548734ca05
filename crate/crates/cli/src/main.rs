fn main() {
    let status = zsl_cli::main_with(std::env::args_os(), &zsl_core::Parallelism::from_env());
    std::process::exit(status);
}
