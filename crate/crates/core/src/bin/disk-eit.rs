fn main() {
    std::process::exit(disk_eit::cli::run(std::env::args_os()));
}
