fn main() {
    std::process::exit(mb_cli::dispatch(std::env::args()));
}
