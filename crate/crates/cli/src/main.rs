fn main() {
    std::process::exit(codeswitch_cli::run(std::env::args_os()));
}
