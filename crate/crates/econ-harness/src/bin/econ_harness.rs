fn main() {
    econ_harness::cli::main();
}
