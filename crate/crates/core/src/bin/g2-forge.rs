fn main() {
    std::process::exit(g2_forge::cli::main_exit_code());
}
