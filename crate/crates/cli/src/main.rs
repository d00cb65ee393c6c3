fn main() {
    std::process::exit(inelastic_lab::run(std::env::args_os()));
}
