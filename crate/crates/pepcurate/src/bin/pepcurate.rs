fn main() {
    std::process::exit(pepcurate::cli::run());
}
