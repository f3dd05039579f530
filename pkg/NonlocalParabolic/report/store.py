# Run ledger and constants cache
import logging
from tinydb import TinyDB, Query
from tinydb.storages import MemoryStorage
from ..constants import ConstantsBundle
from ..utils import stable_key


def constants_key(geometry, nx, K, convention, t_gibbs, bounds):
    """cache key of a ConstantsBundle"""
    return stable_key({
        'geometry': geometry.to_dict(), 'nx': nx, 'K': K, 'convention': convention, 't_gibbs': t_gibbs,
        'bounds': [[b.p, b.q, b.P, b.Q] for b in bounds],
    })


class ReportStore:
    def __init__(self, serialize_path=None):
        """
        @serialize_path: str, ledger file, None for in-memory storage
        """
        # 有路径则持久化, 否则仅在内存中
        if serialize_path is not None:
            self.db = TinyDB(serialize_path)
        else:
            self.db = TinyDB(storage=MemoryStorage)
        self.runs = self.db.table('runs')
        self.constants = self.db.table('constants')

    def add_run(self, report: dict, command, spec_hash):
        doc_id = self.runs.insert({
            'command': command, 'spec_hash': spec_hash, 'started': report.get('started'), 'report': report,
        })
        logging.info(f'run {doc_id} ({command}) stored')
        return doc_id

    def get_runs(self, spec_hash=None):
        if spec_hash is None:
            return self.runs.all()
        return self.runs.search(Query().spec_hash == spec_hash)

    def get_constants(self, key):
        found = self.constants.search(Query().key == key)
        if len(found) == 0:
            return None
        logging.info(f'constants {key} read from cache')
        return ConstantsBundle.from_dict(found[0]['bundle'])

    def put_constants(self, key, bundle: ConstantsBundle):
        # 同一个 key 只保留一条
        self.constants.upsert({'key': key, 'bundle': bundle.to_dict()}, Query().key == key)

    def close(self):
        self.db.close()
