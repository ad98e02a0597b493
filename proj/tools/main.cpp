#include "cli_app.hpp"

int main(int argc, char** argv) { return hsdiff::cli::run_cli(argc, argv); }
