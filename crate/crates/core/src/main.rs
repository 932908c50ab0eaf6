fn main() {
    std::process::exit(landau::run::main_with_args(std::env::args_os()));
}
