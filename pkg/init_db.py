# init_db.py
# Создаёт таблицы архива прогонов по DATABASE_URL (или URL из аргумента).
import sys

from config import get_settings
from db import init_db


def main() -> int:
    url = sys.argv[1] if len(sys.argv) > 1 else get_settings().database_url
    if not url:
        print("⚠️ DATABASE_URL не задан — архив отключён")
        return 2
    init_db(url)
    print(f"✅ Таблицы архива созданы: {url}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
