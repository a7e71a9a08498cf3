fn main() {
    std::process::exit(divflow::run(std::env::args_os()));
}
