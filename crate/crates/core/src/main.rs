fn main() {
    let code = collatz_lab::cli::run(std::env::args_os());
    std::process::exit(code);
}
