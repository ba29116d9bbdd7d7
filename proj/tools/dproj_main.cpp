#include "dproj/cli.hpp"

int main(int argc, char** argv) { return dproj::cli::run(argc, argv); }
