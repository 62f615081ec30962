fn main() {
    std::process::exit(scatlab::cli::main());
}
