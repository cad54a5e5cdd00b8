use sixm_cli::{parse_args, run};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inv = match parse_args(args) {
        Ok(inv) => inv,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    };
    if let Err(e) = run(&inv) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
