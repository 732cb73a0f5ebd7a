fn main() {
    let code = skinshade::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
