fn main() {
    std::process::exit(cinemine::run())
}
