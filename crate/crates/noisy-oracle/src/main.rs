fn main() {
    std::process::exit(noisy_oracle::cli::main());
}
