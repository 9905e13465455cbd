from functools import partial
from threading import RLock

from cachetools import LRUCache
from cachetools.keys import hashkey

# поля и их таблицы: FieldSpec строится один раз на (p, n)
field_cache = LRUCache(maxsize=64)

# перечисления сфер, сеток и групп
geometry_cache = LRUCache(maxsize=2048)

# разложения блоков в суммы ортогональных матриц
decomposition_cache = LRUCache(maxsize=4096)

# карты расстояний BFS (самые тяжелые объекты)
oracle_cache = LRUCache(maxsize=32)

cache_lock = RLock()


def cache_key(name: str):
    """Ключ с именем функции: несколько функций делят один кэш и одинаковые аргументы."""
    return partial(hashkey, name)


def clear_field_cache(field=None):
    """
    Очищает кеш геометрии, разложений и оракула для конкретного поля или целиком.

    Args:
        field: FieldSpec, записи которого нужно удалить. Если None, очищает всё.
    """
    if field is None:
        clear_all_cache()
        return

    with cache_lock:
        for cache in (geometry_cache, decomposition_cache, oracle_cache):
            keys_to_remove = []
            for key in list(cache.keys()):
                # ключ: имя функции и кортеж аргументов; ищем в нем наше поле
                if isinstance(key, tuple) and any(_mentions(k, field) for k in key):
                    keys_to_remove.append(key)

            for key in keys_to_remove:
                if key in cache:
                    del cache[key]


def _mentions(item, field) -> bool:
    return item == field or getattr(item, "field", None) == field


def clear_all_cache():
    """Очищает все кэши"""
    with cache_lock:
        field_cache.clear()
        geometry_cache.clear()
        decomposition_cache.clear()
        oracle_cache.clear()
