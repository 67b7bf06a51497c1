fn main() {
    std::process::exit(planar_ssf::cli::main());
}
