// placeholder; full CLI added with the service modules
int main() { return 0; }
