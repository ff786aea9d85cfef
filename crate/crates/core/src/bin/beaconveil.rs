fn main() {
    let seed = std::env::var(beaconveil::cli::SEED_ENV).ok();
    let code = beaconveil::cli::run(std::env::args_os(), seed, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
