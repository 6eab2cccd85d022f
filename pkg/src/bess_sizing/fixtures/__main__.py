from . import write_fixtures

if __name__ == "__main__":
    for path in write_fixtures():
        print(path)
