#include "pal/cli.hpp"

int main(int argc, char** argv) { return pal::cli::run(argc, argv); }
