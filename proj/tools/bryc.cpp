#include "bryc/cli.hpp"

int main(int argc, char** argv) { return bryc::cli::run(argc, argv); }
