fn main() {
    std::process::exit(qembed::cli::main());
}
