fn main() {
    std::process::exit(blackbench::run(std::env::args_os()));
}
