fn main() {
    std::process::exit(homsel::cli::main());
}
