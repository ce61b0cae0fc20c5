fn main() {
    std::process::exit(qrc_cli::run());
}
