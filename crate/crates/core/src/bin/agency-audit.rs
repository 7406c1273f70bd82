fn main() {
    std::process::exit(agency_audit::cli::main_with(std::env::args_os()));
}
