fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    std::process::exit(mmwave_d2d::cli::run(std::env::args_os()));
}
