fn main() {
    std::process::exit(kstab_cli::run(std::env::args_os()));
}
