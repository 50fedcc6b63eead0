fn main() {
    std::process::exit(graph_products::frontend::cli_main());
}
