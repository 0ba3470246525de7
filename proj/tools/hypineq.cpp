#include "hypineq/cli.hpp"

int main(int argc, char** argv) { return hypineq::cli::run(argc, argv); }
