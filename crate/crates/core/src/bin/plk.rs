fn main() {
    std::process::exit(poset_leavitt::cli::main_with(std::env::args_os()));
}
