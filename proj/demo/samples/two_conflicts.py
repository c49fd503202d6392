import os


def load(path):
<<<<<<< ours
    with open(path, encoding="utf-8") as fh:
||||||| base
    with open(path) as fh:
=======
    with open(path, "r") as fh:
>>>>>>> theirs
        return fh.read()


def save(path, text):
<<<<<<< ours
    os.makedirs(os.path.dirname(path), exist_ok=True)
||||||| base
=======
    tmp = path + ".tmp"
>>>>>>> theirs
    with open(path, "w") as fh:
        fh.write(text)
