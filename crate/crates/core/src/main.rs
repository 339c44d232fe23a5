fn main() {
    std::process::exit(stabcorr::cli::run());
}
