#include "cli_app.hpp"

int main(int argc, char** argv) { return dwta::cli::run(argc, argv); }
