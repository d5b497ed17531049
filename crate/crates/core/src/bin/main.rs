fn main() {
    algham::cli_main();
}
