fn main() {
    std::process::exit(soliton_lab::run(std::env::args_os()));
}
