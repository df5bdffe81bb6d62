use clap::Parser;

use camid::cli::{Cli, Command};
use camid::commands::{cmd_eval, cmd_extract, cmd_predict, cmd_train};

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Eval(args) => cmd_eval(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code() as i32);
    }
}
