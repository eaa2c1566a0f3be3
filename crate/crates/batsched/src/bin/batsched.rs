fn main() {
    std::process::exit(batsched::cli::run());
}
