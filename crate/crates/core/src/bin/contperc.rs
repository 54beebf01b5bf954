use std::process::exit;

fn main() {
    exit(contperc::cli::parse_and_dispatch(std::env::args()));
}
