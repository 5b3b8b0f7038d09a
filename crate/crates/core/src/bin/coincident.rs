fn main() {
    std::process::exit(coincident_pulses::run_cli(std::env::args_os()));
}
