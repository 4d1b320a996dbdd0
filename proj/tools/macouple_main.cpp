#include "macouple/cli.hpp"

int main(int argc, char** argv) { return macouple::run_cli(argc, argv); }
