#include "nonsmooth/cli.hpp"

int main(int argc, char** argv) { return nonsmooth::cli::dispatch(argc, argv); }
