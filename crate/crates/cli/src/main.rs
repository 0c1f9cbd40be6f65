fn main() {
    std::process::exit(thui_cli::run_process());
}
