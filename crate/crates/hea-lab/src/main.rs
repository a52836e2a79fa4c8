fn main() {
    let code = hea_lab::runner::run(std::env::args());
    std::process::exit(code);
}
