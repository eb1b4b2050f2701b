fn main() {
    let code = curvfun::cli::run(std::env::args_os());
    std::process::exit(code);
}
